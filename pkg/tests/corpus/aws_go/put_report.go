package main

import (
	"os"

	"github.com/aws/aws-sdk-go/aws"
	"github.com/aws/aws-sdk-go/aws/session"
	"github.com/aws/aws-sdk-go/service/s3"
)

func Handler(body string) error {
	sess := session.Must(session.NewSession())
	svc := s3.New(sess)
	_, err := svc.PutObject(&s3.PutObjectInput{
		Bucket: aws.String(os.Getenv("REPORT_BUCKET")),
		Key:    aws.String("daily/report.txt"),
	})
	return err
}
