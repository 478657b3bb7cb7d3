package main

import (
	"os"

	"github.com/aws/aws-sdk-go/aws"
	"github.com/aws/aws-sdk-go/aws/session"
	"github.com/aws/aws-sdk-go/service/dynamodb"
)

func Handler(id string) error {
	svc := dynamodb.New(session.Must(session.NewSession()))
	_, err := svc.GetItem(&dynamodb.GetItemInput{
		TableName: aws.String(os.Getenv("USERS_TABLE")),
	})
	return err
}
