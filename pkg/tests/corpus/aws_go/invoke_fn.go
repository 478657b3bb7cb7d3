package main

import (
	"github.com/aws/aws-sdk-go/aws"
	"github.com/aws/aws-sdk-go/aws/session"
	"github.com/aws/aws-sdk-go/service/lambda"
)

func Handler(payload []byte) error {
	svc := lambda.New(session.Must(session.NewSession()))
	_, err := svc.Invoke(&lambda.InvokeInput{
		FunctionName: aws.String("billing-worker"),
		Payload:      payload,
	})
	return err
}
